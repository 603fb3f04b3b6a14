#include <doctest.h>

#include <set>

#include "contactnav/scene.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("cell set algebra") {
    const CellSet a(std::vector<CellIndex>{5, 1, 3, 3});
    const CellSet b(std::vector<CellIndex>{3, 4, 5});
    CHECK(a.values() == std::vector<CellIndex>{1, 3, 5});
    CHECK(a.united(b).values() == std::vector<CellIndex>{1, 3, 4, 5});
    CHECK(a.minus(b).values() == std::vector<CellIndex>{1});
    CHECK(a.intersected(b).values() == std::vector<CellIndex>{3, 5});
    CHECK(a.intersection_size(b) == 2);
    CHECK(CellSet(std::vector<CellIndex>{3}).subset_of(a));
    CHECK_FALSE(b.subset_of(a));
    CHECK(a.contains(5));
    CHECK_FALSE(a.contains(4));
}

TEST_CASE("grid spec validation and indexing") {
    GridSpec s = small_grid(4, 3, 0.5);
    CHECK(s.cell_count() == 12);
    CHECK(s.index({3, 2}) == 11);
    CHECK(s.coord(7) == CellCoord{3, 1});
    CHECK(s.locate(Vec2(1.9, 0.1)) == CellCoord{3, 0});
    CHECK(s.locate(Vec2(-0.1, 0.1))[0] == -1);
    s.resolution = 0.0;
    CHECK_THROWS_AS(s.validate(), GeometryError);
    s = small_grid();
    s.dims = {0, 3};
    CHECK_THROWS_AS(s.validate(), GeometryError);
}

TEST_CASE("rasterize: degenerate segment is the containing cell") {
    const GridSpec s = small_grid();
    const Vec2 c = s.center(CellCoord{4, 7});
    const CellSet cells = rasterize_capsule(c, c, 0.4 * s.resolution, s);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == s.index({4, 7}));
}

TEST_CASE("rasterize: symmetric in endpoints") {
    const GridSpec s = small_grid();
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const Vec2 a(rng.uniform(-0.2, 1.0), rng.uniform(-0.2, 1.0));
        const Vec2 b(rng.uniform(-0.2, 1.0), rng.uniform(-0.2, 1.0));
        const double r = rng.uniform(0.0, 0.1);
        CHECK(rasterize_capsule(a, b, r, s) == rasterize_capsule(b, a, r, s));
    }
}

TEST_CASE("rasterize: horizontal band over five cell centers") {
    const GridSpec s = small_grid();
    const Vec2 a = s.center(CellCoord{3, 5});
    const Vec2 b = s.center(CellCoord{7, 5});
    const CellSet cells = rasterize_capsule(a, b, 0.5 * s.resolution, s);
    for (int i = 3; i <= 7; ++i) CHECK(cells.contains(s.index({i, 5})));
    std::vector<CellIndex> oracle;
    for (CellIndex c = 0; c < s.cell_count(); ++c)
        if (near_segment(s.center(c), a, b, 0.5 * s.resolution)) oracle.push_back(c);
    CHECK(cells.values() == oracle);
    CHECK(cells.size() == 5);
}

TEST_CASE("rasterize: points outside the grid clip") {
    const GridSpec s = small_grid();
    CHECK(rasterize_capsule(Vec2(-1, -1), Vec2(-0.5, -1), 0.1, s).empty());
    const CellSet part = rasterize_capsule(Vec2(-1, 0.025), Vec2(0.1, 0.025), 0.01, s);
    CHECK(part.values() == std::vector<CellIndex>{0, 1});
}

TEST_CASE("dilate, pad and unpad") {
    const GridSpec s = small_grid(5, 5, 1.0);
    const CellSet one(std::vector<CellIndex>{s.index({0, 0})});
    CHECK(dilate(one, s).size() == 4);
    const CellSet mid(std::vector<CellIndex>{s.index({2, 2})});
    CHECK(dilate(mid, s).size() == 9);
    CHECK(dilate(mid, s, 2).size() == 25);
    const GridSpec p = padded(s, 1);
    CHECK(p.dims == CellCoord{7, 7});
    CHECK((p.center(CellCoord{1, 1}) - s.center(CellCoord{0, 0})).norm() < 1e-12);
    const CellSet ring = unpad(dilate(CellSet(std::vector<CellIndex>{p.index({1, 1})}), p), s, 1);
    CHECK(ring.size() == 4);
}

TEST_CASE("ground truth grid labels are a subset of occupied cells") {
    GroundTruthGrid g(small_grid(4, 4, 1.0));
    g.set_occupied(3, 7);
    g.set_occupied(5);
    CHECK(g.occupied_count() == 2);
    CHECK(g.object_ids() == std::vector<std::int32_t>{7});
    CHECK(g.cells_of(7).values() == std::vector<CellIndex>{3});
    g.clear(3);
    CHECK(g.object_id(3) == 0);
    CHECK(g.first_hit(CellSet(std::vector<CellIndex>{1, 5, 9})) == 5);
}

TEST_CASE("scene: single pipe spans the full width") {
    SceneParams p;
    p.domain = Domain::Pipe;
    p.pipe_count = {1, 1};
    const GridSpec s = small_grid();
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        const GroundTruthGrid g = generate_scene(p, s, seed);
        REQUIRE(g.object_ids().size() == 1);
        std::set<int> cols;
        for (CellIndex c : g.cells_of(g.object_ids()[0])) cols.insert(s.coord(c)[0]);
        CHECK(*cols.begin() == 0);
        CHECK(*cols.rbegin() == 15);
    }
}

TEST_CASE("scene: empty shelf") {
    SceneParams p;
    p.domain = Domain::Shelf;
    p.object_count = {0, 0};
    p.partition_count = {0, 0};
    CHECK(generate_scene(p, small_grid(), 5).occupied_count() == 0);
}

TEST_CASE("scene: infeasible keep-out") {
    SceneParams p;
    p.domain = Domain::Pipe;
    p.pipe_count = {1, 1};
    p.max_retries = 20;
    const GridSpec s = small_grid();
    std::vector<CellIndex> all;
    for (CellIndex c = 0; c < s.cell_count(); ++c) all.push_back(c);
    p.keep_free = CellSet(all);
    CHECK_THROWS_AS(generate_scene(p, s, 1), InfeasibleScene);
}

TEST_CASE("scene: parameter validation") {
    SceneParams p;
    p.pipe_count = {4, 2};
    CHECK_THROWS(p.validate());
    p = SceneParams{};
    p.pipe_thickness = 0;
    CHECK_THROWS(p.validate());
}

TEST_SUITE("properties") {
    TEST_CASE("workspace: generator determinism") {
        const auto t = reference_template(Domain::Pipe);
        for (Domain d : {Domain::Pipe, Domain::Shelf}) {
            SceneParams p;
            p.domain = d;
            for (std::uint64_t seed = 40; seed < 50; ++seed) {
                const GroundTruthGrid a = generate_scene(p, t.spec, seed);
                const GroundTruthGrid b = generate_scene(p, t.spec, seed);
                CHECK(a == b);
            }
        }
    }

    TEST_CASE("workspace: every pipe touches both extreme columns") {
        const auto t = reference_template(Domain::Pipe);
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const Scenario sc = instantiate(t, seed);
            const GridSpec& s = sc.world.spec();
            const auto ids = sc.world.object_ids();
            CHECK(ids.size() >= 5);
            for (auto id : ids) {
                bool first = false, last = false;
                for (CellIndex c : sc.world.cells_of(id)) {
                    first |= s.coord(c)[0] == 0;
                    last |= s.coord(c)[0] == s.dims[0] - 1;
                }
                CHECK(first);
                CHECK(last);
            }
        }
    }

    TEST_CASE("workspace: object ids only on occupied cells, scenes keep start and goal free") {
        for (Domain d : {Domain::Pipe, Domain::Shelf}) {
            const auto t = reference_template(d);
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const Scenario sc = instantiate(t, seed);
                for (CellIndex c = 0; c < sc.world.spec().cell_count(); ++c)
                    if (sc.world.object_id(c) != 0) CHECK(sc.world.occupied(c));
                CHECK_FALSE(sc.world.intersects(robot_cells(sc.arm, sc.start, sc.world.spec())));
                CHECK_FALSE(sc.world.intersects(robot_cells(sc.arm, sc.goal, sc.world.spec())));
            }
        }
    }

    TEST_CASE("workspace: rasterization matches brute force on random capsules") {
        const GridSpec s = small_grid(20, 14, 0.03);
        Rng rng(11);
        for (int k = 0; k < 100; ++k) {
            const Vec2 a(rng.uniform(-0.1, 0.7), rng.uniform(-0.1, 0.5));
            const Vec2 b(rng.uniform(-0.1, 0.7), rng.uniform(-0.1, 0.5));
            const double r = rng.uniform(0.0, 0.08);
            std::vector<CellIndex> oracle;
            for (CellIndex c = 0; c < s.cell_count(); ++c)
                if (near_segment(s.center(c), a, b, r)) oracle.push_back(c);
            CHECK(rasterize_capsule(a, b, r, s).values() == oracle);
        }
    }
}

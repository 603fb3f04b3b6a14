#include "contactnav/external_predictor.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "contactnav/wire.hpp"

namespace contactnav {

namespace {

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }
    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
};

[[noreturn]] void fail(const std::string& what) { throw ExternalPredictorFailure(what); }

}  // namespace

std::vector<double> run_external_predictor(const OccupancyEstimate& est, const std::vector<std::string>& argv,
                                           int timeout_ms) {
    if (argv.empty()) fail("empty command");
    const Bytes request = encode_frame(make_predict_request(est));

    // Socket pairs rather than pipes so writes can use MSG_NOSIGNAL.
    int in_pair[2], out_pair[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) fail("socketpair failed");
    Fd in_parent(in_pair[0]), in_child(in_pair[1]);
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) fail("socketpair failed");
    Fd out_parent(out_pair[0]), out_child(out_pair[1]);

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) fail("fork failed");
    if (pid == 0) {
        ::dup2(in_child.fd, STDIN_FILENO);
        ::dup2(out_child.fd, STDOUT_FILENO);
        ::execvp(cargv[0], cargv.data());
        ::_exit(127);
    }
    in_child.reset();
    out_child.reset();
    ::fcntl(in_parent.fd, F_SETFL, O_NONBLOCK);
    ::fcntl(out_parent.fd, F_SETFL, O_NONBLOCK);

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    std::size_t written = 0;
    Bytes reply;
    bool eof = false;
    std::string error;
    while (!eof) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            error = "timed out after " + std::to_string(timeout_ms) + " ms";
            break;
        }
        pollfd fds[2]{{out_parent.fd, POLLIN, 0}, {in_parent.fd, POLLOUT, 0}};
        const nfds_t nfds = in_parent.fd >= 0 ? 2 : 1;
        const int rc = ::poll(fds, nfds, static_cast<int>(left.count()));
        if (rc < 0 && errno != EINTR) {
            error = "poll failed";
            break;
        }
        if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            const ssize_t n = ::send(in_parent.fd, request.data() + written, request.size() - written, MSG_NOSIGNAL);
            if (n > 0) written += static_cast<std::size_t>(n);
            if (n < 0 && errno != EAGAIN && errno != EINTR) written = request.size();  // child stopped reading
            if (written == request.size()) {
                ::shutdown(in_parent.fd, SHUT_WR);
                in_parent.reset();
            }
        }
        if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
            std::uint8_t buf[65536];
            const ssize_t n = ::read(out_parent.fd, buf, sizeof buf);
            if (n > 0) reply.insert(reply.end(), buf, buf + n);
            if (n == 0) eof = true;
            if (n < 0 && errno != EAGAIN && errno != EINTR) eof = true;
        }
        // Stop early once a complete frame has arrived.
        if (reply.size() >= 4 && reply.size() >= 4 + static_cast<std::size_t>(get_u32(reply, 0))) break;
    }

    int status = 0;
    if (!error.empty()) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        fail(error);
    }
    // Give the child the remaining budget to exit, then reap it regardless.
    for (;;) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            break;
        }
        ::usleep(1000);
    }
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
        fail("predictor exited with status " + std::to_string(WEXITSTATUS(status)));

    try {
        std::size_t off = 0;
        const Frame f = decode_frame(reply, off);
        return parse_predict_response(f, est.spec());
    } catch (const ProtocolError& e) {
        fail(std::string("protocol violation: ") + e.what());
    }
}

}  // namespace contactnav

// Analyzer subprocesses speaking line-delimited JSON.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <exception>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "metamorph/analyzer.hpp"

extern char** environ;

namespace metamorph {

namespace {

struct Child {
    pid_t pid = -1;
    int to_child = -1;
    int from_child = -1;
};

Child spawn(const std::vector<std::string>& argv) {
    if (argv.empty()) throw AnalyzerUnavailable("empty analyzer command");
    int in[2];
    int out[2];
    if (pipe2(in, O_CLOEXEC) != 0) throw AnalyzerUnavailable(std::strerror(errno));
    if (pipe2(out, O_CLOEXEC) != 0) {
        close(in[0]);
        close(in[1]);
        throw AnalyzerUnavailable(std::strerror(errno));
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out[1], STDOUT_FILENO);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    Child c;
    const int rc = posix_spawnp(&c.pid, argv[0].c_str(), &fa, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    close(in[0]);
    close(out[1]);
    if (rc != 0) {
        close(in[1]);
        close(out[0]);
        throw AnalyzerUnavailable("cannot start '" + argv[0] + "': " + std::strerror(rc));
    }
    c.to_child = in[1];
    c.from_child = out[0];
    return c;
}

// Waits briefly for a clean exit, then kills.
void reap(pid_t pid) {
    for (int i = 0; i < 200; ++i) {
        int status = 0;
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid || (r < 0 && errno != EINTR)) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    kill(pid, SIGKILL);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
}

void write_requests(int fd, const std::vector<AnalyzerRequest>& batch, std::size_t begin, std::size_t end) {
    // A dead child must surface as EPIPE here, not kill the process.
    sigset_t block;
    sigemptyset(&block);
    sigaddset(&block, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &block, nullptr);
    std::string buf;
    for (std::size_t i = begin; i < end; ++i) {
        nlohmann::json req{{"id", batch[i].id}, {"source", batch[i].source}};
        if (!batch[i].hint.empty()) req["hint"] = batch[i].hint;
        buf += req.dump();
        buf += '\n';
        if (buf.size() < 65536 && i + 1 < end) continue;
        std::size_t off = 0;
        while (off < buf.size()) {
            const ssize_t n = write(fd, buf.data() + off, buf.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                close(fd);
                return;
            }
            off += static_cast<std::size_t>(n);
        }
        buf.clear();
    }
    close(fd);
}

void run_worker(const std::vector<AnalyzerRequest>& batch, std::size_t begin, std::size_t end,
                const std::vector<std::string>& argv, const ExternalOptions& options,
                std::vector<PredictionRecord>& out) {
    const std::string analyzer_id = "cmd:" + argv[0];
    std::unordered_map<std::string, std::deque<std::size_t>> pending;
    for (std::size_t i = begin; i < end; ++i) {
        pending[batch[i].id].push_back(i);
        out[i].method_id = batch[i].id;
        out[i].analyzer_id = analyzer_id;
    }
    if (begin == end) return;

    Child child = spawn(argv);
    std::thread writer(write_requests, child.to_child, std::cref(batch), begin, end);

    std::size_t resolved = 0;
    bool timed_out = false;
    std::string buf;
    char chunk[65536];

    auto handle_line = [&](std::string_view line) {
        if (line.empty()) return;
        nlohmann::json msg = nlohmann::json::parse(line, nullptr, false);
        if (msg.is_discarded() || !msg.is_object() || !msg.contains("id") || !msg["id"].is_string() ||
            !msg.contains("label") || !msg["label"].is_string()) {
            return;  // the item stays pending and is flagged at the end
        }
        auto it = pending.find(msg["id"].get<std::string>());
        if (it == pending.end() || it->second.empty()) return;  // unknown or repeated id
        const std::size_t idx = it->second.front();
        it->second.pop_front();
        ++resolved;
        PredictionRecord& r = out[idx];
        r.raw = msg["label"].get<std::string>();
        try {
            r.label = normalize_label(r.raw);
        } catch (const EmptyLabel&) {
            r.flagged = true;
            r.error = "empty label";
        }
    };

    const std::size_t total = end - begin;
    while (resolved < total) {
        pollfd p{child.from_child, POLLIN, 0};
        const int ready = poll(&p, 1, static_cast<int>(options.timeout.count()));
        if (ready < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (ready == 0) {
            timed_out = true;
            break;
        }
        const ssize_t n = read(child.from_child, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (n == 0) break;
        buf.append(chunk, static_cast<std::size_t>(n));
        std::size_t start = 0;
        for (std::size_t nl = buf.find('\n', start); nl != std::string::npos; nl = buf.find('\n', start)) {
            handle_line(std::string_view(buf).substr(start, nl - start));
            start = nl + 1;
        }
        buf.erase(0, start);
    }
    if (resolved < total && !timed_out && !buf.empty()) handle_line(buf);  // final line without newline

    if (resolved < total) kill(child.pid, SIGKILL);
    writer.join();
    close(child.from_child);
    reap(child.pid);

    for (auto& [id, left] : pending) {
        for (std::size_t idx : left) {
            PredictionRecord& r = out[idx];
            r.flagged = true;
            r.error = timed_out ? "timeout" : "no valid response";
        }
    }
    for (std::size_t i = begin; i < end; ++i) {
        if (out[i].flagged) out[i].label = Label{{"error"}};
    }
}

}  // namespace

std::vector<PredictionRecord> external_predict(const std::vector<AnalyzerRequest>& batch,
                                               const std::vector<std::string>& argv,
                                               const ExternalOptions& options) {
    if (argv.empty()) throw AnalyzerUnavailable("empty analyzer command");
    std::vector<PredictionRecord> out(batch.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, batch.size()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    const std::size_t per = batch.size() / workers;
    const std::size_t extra = batch.size() % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t end = begin + per + (w < extra ? 1 : 0);
        threads.emplace_back([&, w, begin, end] {
            try {
                run_worker(batch, begin, end, argv, options, out);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace metamorph

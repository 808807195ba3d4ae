// Test analyzer for the JSONL protocol. Answers each request with its
// "hint", or with the method name found in the source when there is none.
// Faults can be injected to exercise the host side; a request whose hint is
// "__malformed__" always gets a broken line.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "metamorph/rng.hpp"

namespace {

std::string name_from_source(const std::string& source) {
    const auto paren = source.find('(');
    if (paren == std::string::npos) return "unknown";
    std::size_t end = paren;
    while (end > 0 && source[end - 1] == ' ') --end;
    std::size_t begin = end;
    while (begin > 0 && (std::isalnum(static_cast<unsigned char>(source[begin - 1])) || source[begin - 1] == '_')) {
        --begin;
    }
    return begin == end ? "unknown" : source.substr(begin, end - begin);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"echo analyzer"};
    std::size_t malformed_every = 0;
    std::size_t shuffle_window = 0;
    std::size_t exit_after = 0;
    std::size_t hang_after = 0;
    std::uint64_t seed = 1;
    app.add_option("--malformed-every", malformed_every, "answer every Nth request with a broken line");
    app.add_option("--shuffle", shuffle_window, "emit responses shuffled within windows of this size");
    app.add_option("--exit-after", exit_after, "exit after this many requests");
    app.add_option("--hang-after", hang_after, "stop answering after this many requests");
    app.add_option("--seed", seed, "shuffle seed");
    CLI11_PARSE(app, argc, argv);

    std::ios::sync_with_stdio(false);
    metamorph::SplitMix64 rng(seed);
    std::vector<std::string> window;
    auto flush = [&] {
        for (std::size_t i = window.size(); i > 1; --i) std::swap(window[i - 1], window[rng.below(i)]);
        for (const auto& line : window) std::cout << line << '\n';
        window.clear();
        std::cout.flush();
    };

    std::string line;
    std::size_t n = 0;
    while (std::getline(std::cin, line)) {
        ++n;
        if (hang_after && n > hang_after) {
            flush();
            std::this_thread::sleep_for(std::chrono::hours(1));
        }
        std::string out;
        nlohmann::json req = nlohmann::json::parse(line, nullptr, false);
        const bool poisoned = req.is_object() && req.value("hint", std::string()) == "__malformed__";
        if (poisoned || (malformed_every && n % malformed_every == 0)) {
            out = "{\"id\": oops";
        } else if (req.is_discarded() || !req.is_object()) {
            out = "{\"error\": \"bad request\"}";
        } else {
            std::string label = req.value("hint", std::string());
            if (label.empty()) label = name_from_source(req.value("source", std::string()));
            out = nlohmann::json{{"id", req.value("id", std::string())}, {"label", label}}.dump();
        }
        window.push_back(std::move(out));
        if (window.size() >= std::max<std::size_t>(1, shuffle_window)) flush();
        if (exit_after && n >= exit_after) break;
    }
    flush();
    return 0;
}

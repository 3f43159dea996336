#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcl/jsonio.hpp"

namespace qcl::cli {

inline constexpr const char* kVersion = "qcl 1.0.0";

// One invocation. Params hold normalized values once canonicalize() has run:
// defaults filled in, integers in decimal, sign lists as "1,-1", rationals
// reduced as "num/den".
struct Request {
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& subcommands();

// Throws PreconditionError on unknown keys or malformed values.
Request canonicalize(const Request& raw);
std::string canonical_string(const Request& canonical);
// 32 hex digits: MD5 of the canonical string and the code version.
std::string request_hash(const Request& canonical);

struct Options {
    bool use_cache = true;
    std::string cache_dir = ".qcl_cache";
    int threads = 1;
    std::string csv_path;  // empty: no CSV
};

struct Outcome {
    int exit_code = 0;
    std::string json;  // bytes written to stdout, newline-terminated
    bool cache_hit = false;
    std::string log;   // human-readable lines for stderr
};

Outcome run(const Request& raw, const Options& opt);

// Full command line (without the program name): global flags, config file,
// QCL_CACHE_DIR, subcommand parsing. Writes stdout/stderr and returns the exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcl::cli

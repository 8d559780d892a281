#ifndef WIBENCH_CLI_HPP_
#define WIBENCH_CLI_HPP_

#include <cstdint>
#include <string>

namespace wibench::cli {

// "655KiB" / "131KiB" / "1MiB" / "4096" / "4096B"
uint64_t parse_size(const std::string& text);

// Exit codes: 0 success, 1 usage error, 2 runtime failure.
int run_cli(int argc, char** argv);

}  // namespace wibench::cli

#endif

#pragma once

#include <iosfwd>

namespace granulex {

/// Entry point of the `granulex` tool. Returns 0 on success, 2 on invalid
/// flags (usage goes to `err`) and 1 on any other failure (one diagnostic
/// line on `err`).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace granulex

// Command-line surface: train / eval / annotate / audit / resplit / bench.
#pragma once

namespace jnlp {

// Exit 0 on success, 1 on runtime errors (one-line message on stderr),
// 2 on usage errors (unknown flag, missing mode).
int run_cli(int argc, const char* const* argv);

}  // namespace jnlp

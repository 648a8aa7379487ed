#include "jnlp/cli.h"

int main(int argc, char** argv) { return jnlp::run_cli(argc, argv); }

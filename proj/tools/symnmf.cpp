#include "symnmf/cli.hpp"

int main(int argc, char** argv) { return symnmf::cli::run(argc, argv); }

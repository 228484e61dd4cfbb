#include "mpsvqe/cli.hpp"

int main(int argc, char** argv) { return mpsvqe::cli::run(argc, argv); }

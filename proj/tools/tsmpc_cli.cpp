#include "tsmpc/cli/app.hpp"

int main(int argc, char** argv) { return tsmpc::cli::run(argc, argv); }

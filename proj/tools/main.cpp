#include "xbx/cli.hpp"

int main(int argc, char** argv) { return xbx::cli::run(argc, argv); }

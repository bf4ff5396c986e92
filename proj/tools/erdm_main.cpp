#include "erdm/cli.hpp"

int main(int argc, char** argv) { return erdm::cli::run(argc, argv); }

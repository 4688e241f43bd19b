#include "nms/cli.hpp"

int main(int argc, char** argv) { return nms::cli::main(argc, argv); }

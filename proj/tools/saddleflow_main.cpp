#include "saddleflow/cli.hpp"

int main(int argc, char** argv) { return saddleflow::cli_main(argc, argv); }

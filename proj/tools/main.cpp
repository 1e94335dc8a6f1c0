#include "cli.hpp"

int main(int argc, char** argv) { return qlnorm::cli::run(argc, argv); }

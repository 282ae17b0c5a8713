#include "fpr/cli.hpp"

int main(int argc, char** argv) { return fpr::cli::run(argc, argv); }

#include "plab/run.hpp"

int main(int argc, char** argv) { return plab::cli_main(argc, argv); }

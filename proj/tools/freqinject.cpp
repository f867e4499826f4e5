#include "freqinject/cli.hpp"

int main(int argc, char** argv) { return freqinject::cli::run(argc, argv); }

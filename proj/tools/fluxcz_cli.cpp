#include "fluxcz/experiment.hpp"

int main(int argc, char** argv) { return fluxcz::run_cli(argc, argv); }

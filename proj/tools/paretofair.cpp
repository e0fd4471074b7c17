#include "paretofair/cli.hpp"

int main(int argc, char** argv) { return pfair::run_cli(argc, argv); }

#include "maq/run.hpp"

int main(int argc, char** argv) { return maq::run_cli(argc, argv); }

#include <etaq/cli_run.hpp>

int main(int argc, char** argv) { return etaq::cli::run(argc, argv); }

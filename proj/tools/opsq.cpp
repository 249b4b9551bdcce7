#include "opsq/cli/app.hpp"

int main(int argc, char** argv) { return opsq::cli::main_entry(argc, argv); }

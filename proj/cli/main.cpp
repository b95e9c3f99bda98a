#include "commands.hpp"

int main(int argc, char** argv) { return hfsp::cli::run(argc, argv); }

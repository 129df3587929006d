#include "epinet/cli/commands.hpp"

int main(int argc, char** argv) { return epinet::cli::dispatch(argc, argv); }

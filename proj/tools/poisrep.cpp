#include <poisrep/cli.hpp>

int main(int argc, char** argv) { return poisrep::run_cli(argc, argv, std::cout, std::cerr); }

#include "reeftip_cli.hpp"

int main(int argc, char** argv) { return reeftip::cli::run(argc, argv); }

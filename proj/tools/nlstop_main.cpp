#include "nlstop/cli.hpp"

int main(int argc, char** argv) { return nlstop::run(argc, argv); }

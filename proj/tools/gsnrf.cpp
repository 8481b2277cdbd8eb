#include "gsnrf/app.hpp"

int main(int argc, char** argv) { return gsnrf::cli_main(argc, argv); }

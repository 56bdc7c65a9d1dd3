#include "hdg/driver.hpp"

int main(int argc, char** argv) { return hdg::run_main(argc, argv); }

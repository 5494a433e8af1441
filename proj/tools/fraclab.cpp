#include "fraclab/cli.hpp"

int main(int argc, char** argv) {
    return fraclab::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

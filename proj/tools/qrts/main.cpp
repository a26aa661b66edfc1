#include <string>
#include <vector>

#include "qrts/cli.hpp"

int main(int argc, char** argv) {
    return qrts::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}

#include "semiclassical/cli.hpp"

int main(int argc, char** argv)
{
    return semiclassical::cli::run(argc, argv);
}

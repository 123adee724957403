#include "cli.hpp"

int main(int argc, char** argv)
{
    return ciconia::cli::run(argc, argv);
}

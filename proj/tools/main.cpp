#include "cli.hpp"

int main(int argc, char** argv)
{
    return deepgrid::cli_main(argc, argv);
}

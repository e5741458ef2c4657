// Room-texturing pipeline CLI. Subcommands are registered as the pipeline
// stages come online; see the README for the full grammar.

#include <cstdio>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::printf("roomtex: no subcommands wired up yet\n");
    return 2;
}

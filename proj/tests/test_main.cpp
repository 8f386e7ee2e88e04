#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <string>

// Path of the glwalk binary for CLI tests, passed as a bare positional
// argument by ctest.
std::string g_glwalk_binary;

int main(int argc, char** argv) {
    doctest::Context ctx;
    std::vector<char*> args;
    for (int i = 0; i < argc; ++i) {
        if (i > 0 && argv[i][0] != '-') {
            g_glwalk_binary = argv[i];
            continue;
        }
        args.push_back(argv[i]);
    }
    ctx.applyCommandLine(static_cast<int>(args.size()), args.data());
    return ctx.run();
}

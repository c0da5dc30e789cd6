#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "hfc/common.hpp"

int main(int argc, char** argv) {
    hfc::set_warnings_enabled(false);
    doctest::Context context(argc, argv);
    return context.run();
}

#include <cstdlib>
#include <iostream>

#include "pairs/fixture.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_fixture <dir> [seed]\n";
        return 2;
    }
    try {
        const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : pairs::fixture::kDefaultSeed;
        pairs::fixture::write_fixture(argv[1], seed);
    } catch (const pairs::Error& e) {
        std::cerr << "ERR:" << pairs::to_string(e.code()) << ":" << e.what() << "\n";
        return pairs::exit_code(e.code());
    }
    return 0;
}

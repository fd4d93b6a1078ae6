#include <cstdio>

int main() {
    std::puts("isatk: CLI under construction");
    return 0;
}

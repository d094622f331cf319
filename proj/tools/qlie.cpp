#include "qlie/qlie.hpp"
#include <cstdio>
int main(){ std::puts("qlie"); return 0; }

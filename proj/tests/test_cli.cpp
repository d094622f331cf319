#include "qlie/qlie.hpp"
int main(){ return 0; }

#include "padlab/casestudies.hpp"
int main() { return 0; }

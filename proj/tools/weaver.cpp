// placeholder; replaced once the cli module lands
int main() { return 0; }

// placeholder; criteria added after unit suite is green
int main() { return 1; }

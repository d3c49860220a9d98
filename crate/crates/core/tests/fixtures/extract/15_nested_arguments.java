public int combine(int a, int b, int c) {
    int r = outer(a, inner(b + c), 3);
    return r;
}

int main() {
    int a, b, c, lo, hi, mid;
    scanf("%d%d%d", &a, &b, &c);
    lo = a;
    if (b < lo) {
        lo = b;
    }
    if (c < lo) {
        lo = c;
    }
    hi = a;
    if (b > hi) {
        hi = b;
    }
    if (c > hi) {
        hi = c;
    }
    mid = a + b + c - lo - hi;
    printf("%d %d %d\n", lo, mid, hi);
    return 0;
}

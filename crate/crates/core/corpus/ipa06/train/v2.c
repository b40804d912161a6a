int main() {
    int n, i;
    float v, lo, hi;
    scanf("%d", &n);
    for (i = 0; i < n; i++) {
        scanf("%f", &v);
        if (i == 0 || v < lo) {
            lo = v;
        }
        if (i == 0 || v > hi) {
            hi = v;
        }
    }
    printf("min: %f, max: %f\n", lo, hi);
    return 0;
}

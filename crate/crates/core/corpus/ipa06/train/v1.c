int main() {
    int n, i;
    float x, min, max;
    scanf("%d", &n);
    scanf("%f", &x);
    min = x;
    max = x;
    for (i = 1; i < n; i++) {
        scanf("%f", &x);
        if (x < min) {
            min = x;
        }
        if (x > max) {
            max = x;
        }
    }
    printf("min: %f, max: %f\n", min, max);
    return 0;
}

int main() {
    int n, i;
    float a, mn, mx;
    scanf("%d", &n);
    i = 0;
    while (i < n) {
        scanf("%f", &a);
        if (i == 0) {
            mn = a;
            mx = a;
        } else {
            if (a < mn) {
                mn = a;
            }
            if (a > mx) {
                mx = a;
            }
        }
        i = i + 1;
    }
    printf("min: %f, max: %f\n", mn, mx);
    return 0;
}

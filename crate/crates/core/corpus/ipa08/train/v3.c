float average(float s, int n) {
    return s / n;
}

int main() {
    int n, i;
    float s, v;
    scanf("%d", &n);
    s = 0;
    for (i = 1; i <= n; i++) {
        scanf("%f", &v);
        s += v;
    }
    printf("%.2f", average(s, n));
    return 0;
}

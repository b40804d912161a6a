int is_divisor(int x, int d) {
    if (x % d == 0) {
        return 1;
    }
    return 0;
}

int main() {
    int n, k, c;
    scanf("%d", &n);
    c = 0;
    for (k = n; k >= 1; k--) {
        c += is_divisor(n, k);
    }
    printf("%d\n", c);
    return 0;
}

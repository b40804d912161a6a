int main() {
    int n, i, div;
    scanf("%d", &n);
    div = 0;
    for (i = 1; i * i <= n; i++) {
        if (n % i == 0) {
            div = div + 2;
            if (i * i == n) {
                div = div - 1;
            }
        }
    }
    printf("%d\n", div);
    return 0;
}

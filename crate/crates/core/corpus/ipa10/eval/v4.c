int main() {
    int n, q, r, len, acc;
    scanf("%d", &n);
    len = 0;
    acc = 0;
    q = n;
    while (q != 0) {
        r = q % 10;
        acc = acc + r;
        q = q / 10;
        len = len + 1;
    }
    printf("%d\n%d\n", len, acc);
    return 0;
}

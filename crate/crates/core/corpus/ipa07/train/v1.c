int main() {
    int n, i, count;
    scanf("%d", &n);
    count = 0;
    for (i = 1; i <= n; i++) {
        if (n % i == 0) {
            count++;
        }
    }
    printf("%d\n", count);
    return 0;
}

int main() {
    int n, k;
    scanf("%d", &n);
    k = 0;
    while (k < n) {
        k = k + 1;
        printf("%d\n", k);
    }
    return 0;
}

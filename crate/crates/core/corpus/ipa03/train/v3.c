int main() {
    int n, m, rest;
    scanf("%d %d", &n, &m);
    rest = n;
    while (rest >= m) {
        rest = rest - m;
    }
    if (rest == 0) {
        printf("yes\n");
    } else {
        printf("no\n");
    }
    return 0;
}

int divides(int d, int x) {
    return x % d == 0;
}

int main() {
    int n, m, ok;
    scanf("%d %d", &n, &m);
    ok = divides(m, n);
    if (ok) {
        printf("yes\n");
    } else {
        printf("no\n");
    }
    return 0;
}

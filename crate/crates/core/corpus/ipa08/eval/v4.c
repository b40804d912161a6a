int main() {
    int n, c;
    float num, soma, media;
    scanf("%d", &n);
    soma = 0;
    c = n;
    while (c > 0) {
        scanf("%f", &num);
        soma = soma + num;
        c--;
    }
    media = soma / n;
    printf("%.2f", media);
    return 0;
}
